import random

import pytest

from selfsim import mealy
from selfsim.gdata_engine import (
    GData,
    SequenceModel,
    VirtualEndo,
    build_representation,
    fcore_witness_check,
    schreier,
    lamp_extension_data,
    wreath_by_regular_data,
)
from selfsim.perm_word import Perm, parse_word
from selfsim.tree_core import equal_to_depth, orbit_type, trivial_to_depth
from selfsim.wreath_models import (
    CosetSpace,
    lamplighter_extension_data,
    prop31_endos,
    z_coset_space,
    z_data,
    zomega_data,
    zwrz_data,
    zwrz_wr_c2_data,
)


def assert_entry(machine, name, section_texts, perm):
    """Exact, model-level comparison of one state's recursion line."""
    sections, got_perm = machine.entry(name)
    assert got_perm == perm
    assert len(sections) == len(section_texts)
    for got, text in zip(sections, section_texts):
        assert machine.element_of(got) == machine.element_of(parse_word(text))


def test_schreier_values_on_z():
    endo = z_data().endos[0]
    # the identity element leaves every coset in place with a trivial cocycle
    for j, t in enumerate(endo.transversal):
        assert schreier(endo, 0, t) == (0, j)
    assert schreier(endo, 1, 0) == (0, 1)
    assert schreier(endo, 1, 1) == (2, 0)
    assert schreier(endo, 2, 0) == (2, 0)
    assert schreier(endo, 2, 1) == (2, 1)


def test_schreier_cocycle_randomized():
    endo = z_data().endos[0]
    rng = random.Random(3)
    for _ in range(300):
        g, h = rng.randint(-30, 30), rng.randint(-30, 30)
        for t in endo.transversal:
            hg, j = schreier(endo, g, t)
            hh, _ = schreier(endo, h, endo.transversal[j])
            total, _ = schreier(endo, g + h, t)
            assert total == hg + hh


def test_transversal_must_start_at_identity():
    model = z_data().model
    with pytest.raises(ValueError):
        VirtualEndo(model, lambda n: True, lambda n: n, (1, 0), lambda n: n % 2)


def test_adding_machine_from_data():
    machine = build_representation(z_data())
    assert machine.alphabet_size == 2
    assert machine.generators == ("a",)
    assert_entry(machine, "a", ["e", "a"], Perm((1, 0)))


def test_engine_states_memoized_by_element():
    machine = build_representation(z_data())
    two = machine.state_of(2)
    assert machine.state_of(1 + 1) == two
    assert machine.state_of(1) == "a"


def test_direct_power_machine_matches_chain():
    machine = build_representation(zomega_data(5))
    assert_entry(machine, "a1", ["e", "a1", "e"], Perm((1, 0, 2)))
    for i in range(2, 6):
        assert_entry(machine, f"a{i}", [f"a{i}", f"a{i}", f"a{i - 1}"], Perm.identity(3))


def test_direct_power_degree_and_orbits():
    data = zomega_data(3)
    assert data.degree == 3
    assert data.orbit_sizes == (2, 1)
    assert orbit_type(build_representation(data)) == (2, 1)


def test_sequence_model_basics():
    model = SequenceModel(z_data().model, 3)
    assert model.identity() == ()
    assert model.multiply((2, 5), (-2, -5)) == ()
    assert model.shift((7,)) == ()
    assert model.shift((1, 4)) == (4,)
    lifted = zomega_data(3).endos[0]
    assert lifted.contains((2, 5))
    assert not lifted.contains((1, 5))


def test_prop31_engine_reproduces_displayed_generators():
    machine = build_representation(prop31_endos(2, 2))
    assert_entry(machine, "g1", ["g2", "e", "g1", "a1"], Perm.identity(4))
    assert_entry(machine, "g2", ["g1", "e", "g2", "e"], Perm.identity(4))
    assert_entry(machine, "a1", ["e", "a1", "a2", "e"], Perm((1, 0, 2, 3)))
    assert_entry(machine, "a2", ["a2", "a2", "a1", "e"], Perm.identity(4))


def test_engine_agrees_with_mealy_table_for_zwrz():
    engine = build_representation(zwrz_data())
    table = mealy.builtin_machine("diagram1")
    pairs = (("g1", "g"), ("a1", "a"))
    for eng_name, tab_name in pairs:
        assert equal_to_depth(
            engine.automorphism(eng_name), table.automorphism(tab_name), 9
        )


def test_homomorphism_at_tree_level():
    machine = build_representation(zwrz_data())
    model = machine.model
    rng = random.Random(5)
    for _ in range(60):
        g = model.random_element(rng)
        h = model.random_element(rng)
        lhs = machine.automorphism_of(g) * machine.automorphism_of(h)
        rhs = machine.automorphism_of(model.multiply(g, h))
        assert equal_to_depth(lhs, rhs, 8)


def test_root_perms_preserve_orbit_blocks():
    data = prop31_endos(2, 2)
    machine = build_representation(data)
    rng = random.Random(9)
    blocks = []
    for offset, endo in zip(data.offsets, data.endos):
        blocks.append(range(offset, offset + endo.index))
    for _ in range(100):
        g = data.model.random_element(rng)
        p = machine.automorphism_of(g).root_perm()
        for block in blocks:
            for y in block:
                assert p(y) in block


def test_oracle_inconsistency_is_an_error():
    model = z_data().model
    broken = VirtualEndo(
        model,
        contains=lambda n: n % 2 == 0,
        image=lambda n: n // 2,
        transversal=(0, 1),
        coset_index=lambda n: 0,  # wrong on odd cosets
    )
    machine = build_representation(GData(model, [broken]))
    with pytest.raises(ValueError):
        machine.entry("a")


# -- wreath product by a regular group --------------------------------------


def test_wreath_by_regular_degree_four():
    data = zwrz_wr_c2_data()
    assert data.degree == 4
    machine = build_representation(data)
    assert set(machine.generators) == {"g1", "a1", "s"}


def test_wreath_by_regular_matches_diagram3():
    engine = build_representation(zwrz_wr_c2_data())
    table = mealy.builtin_machine("diagram3")
    for eng_name, tab_name in (("s", "s"), ("a1", "a"), ("g1", "g")):
        assert equal_to_depth(
            engine.automorphism(eng_name), table.automorphism(tab_name), 8
        )


def test_wreath_by_regular_validates_group():
    data = zwrz_data()
    with pytest.raises(ValueError):
        wreath_by_regular_data(data, [Perm((1, 0)), Perm.identity(2)])
    with pytest.raises(ValueError):
        wreath_by_regular_data(data, [Perm.identity(3), Perm((1, 0, 2))])
    with pytest.raises(ValueError):
        wreath_by_regular_data(data, [Perm.identity(2), Perm((0, 1))])


def test_wreath_identity_element_has_trivial_action():
    data = zwrz_wr_c2_data()
    machine = build_representation(data)
    ident = machine.automorphism_of(data.model.identity())
    assert ident.root_perm().is_identity()
    assert trivial_to_depth(machine, ident.word, 10)


# -- lamp extension ----------------------------------------------------------


def test_lamp_extension_degree_and_orbit_type():
    data = lamplighter_extension_data((2,))
    assert data.degree == 5
    assert data.orbit_sizes == (4, 1)
    assert orbit_type(build_representation(data)) == (4, 1)


def test_lamp_extension_identity_coset():
    data = lamplighter_extension_data((2,))
    endo = data.endos[0]
    assert endo.coset_index(data.model.identity()) == 0


def test_lamp_extension_transversal_decomposition():
    data = lamplighter_extension_data((2,))
    model, endo = data.model, data.endos[0]
    rng = random.Random(17)
    for _ in range(500):
        g = model.random_element(rng)
        j = endo.coset_index(g)
        rep = endo.transversal[j]
        assert endo.contains(model.multiply(g, model.invert(rep)))
    for j, rep in enumerate(endo.transversal):
        assert endo.coset_index(rep) == j
        assert endo.contains(rep) == (j == 0)


def test_lamp_extension_requires_orbit_sizes_at_least_two():
    with pytest.raises(ValueError):
        lamp_extension_data((2,), zwrz_data(), [z_coset_space(), z_coset_space()])


def test_lamp_extension_requires_onto_coset_map():
    space = z_coset_space()
    off = CosetSpace(
        label=space.label,
        translate=space.translate,
        identity_label=space.identity_label,
        lambda_image=space.lambda_image,
        lambda_surjective=False,
    )
    with pytest.raises(ValueError):
        lamp_extension_data((2,), z_data(), [off])


def test_lamp_extension_coset_map_examples():
    space = z_coset_space()
    assert space.lambda_image(6) == 3
    assert space.lambda_image(-4) == -2
    assert space.lambda_image(3) is None
    assert space.translate(space.label(5), -5) == space.identity_label


def test_coset_space_translation_invariant():
    space = z_coset_space()
    model = z_data().model
    rng = random.Random(13)
    for _ in range(300):
        x = model.random_element(rng)
        g = model.random_element(rng)
        assert space.translate(space.label(x), g) == space.label(model.multiply(x, g))
    assert space.label(model.identity()) == space.identity_label


# -- witness checks ----------------------------------------------------------


def test_fcore_witnesses_zwrz():
    data = zwrz_data()
    report = fcore_witness_check(data, 100, 20, random.Random(23))
    assert report.sampled == 100
    assert report.all_witnessed


def test_concatenated_endos_fix_the_identity():
    from selfsim.wreath_models import mixed_base_data

    data = mixed_base_data((2,), 1)
    ident = data.model.identity()
    for endo in data.endos:
        assert endo.contains(ident)
        assert data.model.is_identity(endo.image(ident))


def test_fcore_witness_skips_identity_samples():
    data = z_data()
    report = fcore_witness_check(data, 25, 16, random.Random(4))
    assert all(not data.model.is_identity(g) for g, _ in report.entries)
    assert report.all_witnessed

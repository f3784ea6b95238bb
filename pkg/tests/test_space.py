import json

import numpy as np
import pytest

from flagcurv.errors import SpaceIOError, SpaceParseError, SpaceValidationError, UndefinedInputError
from flagcurv.metrics import Family
from flagcurv.space import (bundled_names, dumps, load_space, parse_space, perturbed_space,
                            serialize_space, space_from_dict, write_space)

CORRUPTED = {
    "bad_antisymmetry": {"antisymmetry"},
    "bad_jacobi": {"jacobi"},
    "bad_spd": {"psi positive-definite", "inner positive-definite"},
    "bad_subalgebra": {"h subalgebra"},
    "bad_adinvariance": {"ad(h)-invariance of m"},
    "bad_bi_inner_symmetry": {"bi_inner symmetry"},
}


def test_bundled_spaces_parse_and_validate(bundled):
    assert bundled.validate().ok
    assert bundled.name in bundled_names()
    assert isinstance(bundled.family, Family)


def test_bundled_names():
    assert set(bundled_names()) == {"abelian_r3", "su2_biinvariant", "su2_berger", "sphere_s2",
                                    "u2_central"}


@pytest.mark.parametrize("name, expected", sorted(CORRUPTED.items()))
def test_corrupted_fixtures_name_the_invariant(name, expected, fixtures_dir):
    with pytest.raises(SpaceValidationError) as exc:
        parse_space(fixtures_dir / f"{name}.json")
    assert expected <= set(exc.value.invariants)


def test_unknown_field(fixtures_dir):
    with pytest.raises(SpaceParseError) as exc:
        parse_space(fixtures_dir / "unknown_field.json")
    assert exc.value.field == "colour"


def test_malformed_json(fixtures_dir):
    with pytest.raises(SpaceParseError, match="malformed JSON"):
        parse_space(fixtures_dir / "malformed.json")


def test_missing_file(tmp_path):
    with pytest.raises(SpaceIOError):
        parse_space(tmp_path / "nope.json")
    with pytest.raises(SpaceIOError):
        load_space("no_such_space")


def _base():
    return {"dimension": 3, "basis": ["e1", "e2", "e3"], "brackets": [],
            "bi_inner": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "h_indices": [], "X": [0.1, 0, 0],
            "metric": {"family": "exponential"}}


@pytest.mark.parametrize("key, value, fld", [
    ("dimension", 0, "dimension"),
    ("basis", ["a", "a", "b"], "basis"),
    ("brackets", [[0, 1, 5, 1.0]], "brackets[0]"),
    ("brackets", [[0, 1, 2]], "brackets[0]"),
    ("bi_inner", [[1, 0], [0, 1]], "bi_inner"),
    ("X", [0, 0], "X"),
    ("metric", {"family": "randers"}, "metric.family"),
    ("assertions", {"berwald": "yes"}, "assertions.berwald"),
    ("h_indices", [0, 0], "h_indices"),
])
def test_schema_errors_name_the_field(key, value, fld):
    data = _base()
    data[key] = value
    with pytest.raises(SpaceParseError) as exc:
        space_from_dict(data)
    assert exc.value.field == fld


def test_missing_required_field():
    data = _base()
    del data["bi_inner"]
    with pytest.raises(SpaceParseError) as exc:
        space_from_dict(data)
    assert exc.value.field == "bi_inner"


def test_infinite_series_needs_nonzero_X():
    data = _base()
    data["X"] = [0, 0, 0]
    data["metric"] = {"family": "infinite-series"}
    with pytest.raises(SpaceParseError) as exc:
        space_from_dict(data)
    assert exc.value.field == "X"


def test_round_trip_is_bit_exact(bundled, tmp_path, rng):
    spaces = [bundled]
    if not bundled.h_indices:
        spaces.append(perturbed_space(bundled, rng))
    for desc in spaces:
        path = tmp_path / f"{desc.name.replace('~', '_')}.json"
        write_space(desc, path)
        back = parse_space(path)
        assert back.to_dict() == desc.to_dict()
        assert serialize_space(back) == serialize_space(desc)
        assert np.array_equal(np.array(back.psi or 0.0), np.array(desc.psi or 0.0))


def test_name_comes_from_filename(tmp_path):
    path = tmp_path / "my_space.json"
    path.write_text(json.dumps(_base()))
    assert parse_space(path).name == "my_space"
    assert load_space(str(path)).name == "my_space"


def test_dumps_uses_17_digits_and_null_for_nonfinite():
    text = dumps({"a": 0.1, "b": float("nan"), "c": np.bool_(True), "d": [1, 2.5]}, indent=None)
    assert json.loads(text) == {"a": 0.1, "b": None, "c": True, "d": [1, 2.5]}
    assert "0.10000000000000001" in text


def test_perturbed_spaces_are_valid(rng):
    for name in ("abelian_r3", "su2_biinvariant", "su2_berger", "u2_central"):
        desc = load_space(name)
        for i in range(5):
            p = perturbed_space(desc, rng, name=f"{name}~{i}")
            assert p.validate().ok
            G = np.array(p.bi_inner) @ np.array(p.psi)
            # the perturbation leaves <X, .> unchanged
            np.testing.assert_allclose(desc.structure.gram @ desc.X_vector, G @ desc.X_vector, atol=1e-12)


def test_perturbation_needs_trivial_isotropy(rng):
    with pytest.raises(UndefinedInputError):
        perturbed_space(load_space("sphere_s2"), rng)

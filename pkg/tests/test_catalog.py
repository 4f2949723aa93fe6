import json

import pytest

from fekete.catalog import (
    CANDIDATE_NAMES,
    GramCandidate,
    UnknownName,
    candidate_from_json,
    candidate_to_json,
    candidates_for,
    get_candidate,
    get_coordinates,
    load_candidate_file,
    make_ngon,
    make_simplex,
)
from fekete.exactalg import sqrt


def test_catalog_sizes():
    assert len(CANDIDATE_NAMES) == 19
    assert [len(candidates_for(n)) for n in (4, 5, 6)] == [2, 4, 13]


def test_unknown_name():
    with pytest.raises(UnknownName):
        get_candidate("dodecahedron")


def test_ngon_entries_are_cosines():
    X = make_ngon(5)
    assert X.entries[0][1] == (sqrt(5) - 1) / 4
    assert X.entries[0][2] == -(sqrt(5) + 1) / 4


@pytest.mark.parametrize("n", [3, 4, 6])
def test_simplex_entries(n):
    X = make_simplex(n)
    off = {X.entries[i][j] for i in range(n) for j in range(n) if i != j}
    assert len(off) == 1
    assert off.pop() * (n - 1) == -1


def test_constructor_rejects_bad_matrices():
    with pytest.raises(ValueError):
        GramCandidate("bad", 2, [[1, 0], [1, 1]])
    with pytest.raises(ValueError):
        GramCandidate("bad", 2, [[2, 0], [0, 1]])


@pytest.mark.parametrize("name", CANDIDATE_NAMES)
def test_json_round_trip(name, tmp_path):
    c = get_candidate(name)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(candidate_to_json(c)))
    back = load_candidate_file(path)
    assert back.n == c.n
    if c.is_quotient:
        assert back.defining.dim == c.defining.dim
        for b in range(c.defining.dim):
            assert abs(back.numeric(b) - c.numeric(b)).max() < 1e-12
    else:
        assert back.entries == c.entries


def test_json_rejects_asymmetric():
    data = candidate_to_json(get_candidate("equator4"))
    data["entries"][0][1] = "1/3"
    with pytest.raises(ValueError):
        candidate_from_json(data)


@pytest.mark.parametrize("name", ["real1", "real2", "real3", "real4"])
def test_coordinates_are_unit_columns_on_s3(name):
    W = get_coordinates(name)
    assert W.d == 4 and W.n == 6
    G = W.gram()
    assert all(G[i][i] == 1 for i in range(6))
    assert G == get_candidate(name).entries

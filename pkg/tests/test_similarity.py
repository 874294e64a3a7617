"""Canonical pair ordering and pairwise similarity."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from soundscape_align import (
    BGAVector,
    DegenerateVectorError,
    PairIndex,
    PairVector,
    bga_category_pair_similarity,
    cosine,
    pairwise_similarity,
    write_pair_vector_csv,
)


def test_pair_index_canonical_order():
    idx = PairIndex.from_site_ids(["C", "A", "B"])
    assert idx.sites == ("A", "B", "C")
    assert idx.pairs == (("A", "B"), ("A", "C"), ("B", "C"))
    assert idx.n_sites == 3
    assert idx.n_pairs == 3


def test_pair_index_matches_upper_triangle_enumeration():
    ids = [f"s{i:02d}" for i in range(8)]
    idx = PairIndex.from_site_ids(reversed(ids))
    iu, ju = np.triu_indices(8, k=1)
    want = tuple((ids[i], ids[j]) for i, j in zip(iu, ju))
    assert idx.pairs == want
    assert idx.n_pairs == 28


def test_pair_index_rejects_duplicates():
    with pytest.raises(ValueError, match=r"duplicate site ids \['A'\]"):
        PairIndex.from_site_ids(["A", "B", "A"])


@given(st.integers(min_value=2, max_value=20))
def test_pair_count_formula(n):
    idx = PairIndex.from_site_ids([f"s{i}" for i in range(n)])
    assert idx.n_pairs == n * (n - 1) // 2


def test_cosine_values():
    assert cosine([1.0, 0.0], [1.0, 0.0]) == 1.0
    assert cosine([1.0, 0.0], [-1.0, 0.0]) == -1.0
    assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0
    assert cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(
        0.7071067811865475, abs=1e-15
    )


def test_cosine_is_scale_invariant():
    u, v = np.array([1.0, 2.0, 3.0]), np.array([-2.0, 0.5, 1.0])
    assert cosine(u, v) == pytest.approx(cosine(1000 * u, 0.001 * v), abs=1e-15)


def test_cosine_clamped_to_unit_interval():
    rng = np.random.default_rng(1)
    for _ in range(200):
        v = rng.standard_normal(4)
        c = cosine(v, v * rng.uniform(0.1, 10.0))
        assert -1.0 <= c <= 1.0


def test_cosine_survives_magnitude_extremes():
    tiny = cosine([1e-200, 1e-200], [1e-200, 1e-200])
    assert tiny == pytest.approx(1.0, abs=1e-12)
    huge = cosine([1e200, 1e200], [-1e200, -1e200])
    assert huge == pytest.approx(-1.0, abs=1e-12)
    mixed = cosine([1e-200, 0.0], [1e200, 0.0])
    assert mixed == pytest.approx(1.0, abs=1e-12)


def test_cosine_rejects_zero_and_mismatch():
    with pytest.raises(DegenerateVectorError):
        cosine([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(ValueError, match="dimension mismatch"):
        cosine([1.0], [1.0, 0.0])


def test_pairwise_similarity_ordering_and_values():
    items = {
        "B": [1.0, 0.0],
        "C": [1.0, 1.0],
        "A": [0.0, 1.0],
    }
    pv = pairwise_similarity(items, comparison_id="demo")
    assert pv.index.pairs == (("A", "B"), ("A", "C"), ("B", "C"))
    assert np.allclose(
        pv.values, [0.0, 0.7071067811865475, 0.7071067811865475], atol=1e-15
    )
    assert pv.comparison_id == "demo"
    assert len(pv) == 3


def test_pairwise_similarity_errors_name_the_site():
    with pytest.raises(DegenerateVectorError, match="site 'B'"):
        pairwise_similarity({"A": [1.0, 0.0], "B": [0.0, 0.0]})
    with pytest.raises(ValueError, match="mixed vector dimensions"):
        pairwise_similarity({"A": [1.0, 0.0], "B": [1.0, 0.0, 0.0]})
    with pytest.raises(ValueError, match="at least 2"):
        pairwise_similarity({"A": [1.0]})


def test_pairwise_similarity_insertion_order_irrelevant():
    rng = np.random.default_rng(2)
    vectors = {f"s{i}": rng.standard_normal(5) for i in range(6)}
    shuffled = dict(reversed(list(vectors.items())))
    a = pairwise_similarity(vectors)
    b = pairwise_similarity(shuffled)
    assert a.index == b.index
    assert np.array_equal(a.values, b.values)


def test_category_similarity_examples():
    vectors = {
        "A": BGAVector(bio=1.0, geo=0.2, anthro=0.0),
        "B": BGAVector(bio=0.25, geo=0.2, anthro=0.5),
    }
    assert bga_category_pair_similarity(vectors, "bio").values[0] == 0.25
    assert bga_category_pair_similarity(vectors, "geo").values[0] == 1.0
    assert bga_category_pair_similarity(vectors, "anthro").values[0] == 0.5


def test_category_similarity_accepts_plain_triples():
    vectors = {"A": (1.0, 0.0, 0.0), "B": (0.4, 0.0, 0.0)}
    assert bga_category_pair_similarity(vectors, "bio").values[0] == pytest.approx(
        0.4
    )


def test_category_similarity_is_symmetric_and_bounded():
    rng = np.random.default_rng(3)
    vectors = {
        f"s{i}": BGAVector(*rng.uniform(0.0, 1.0, size=3)) for i in range(5)
    }
    for cat in ("bio", "geo", "anthro"):
        pv = bga_category_pair_similarity(vectors, cat)
        assert np.all(pv.values >= 0.0)
        assert np.all(pv.values <= 1.0)


def test_category_similarity_validation():
    ok = {"A": (0.5, 0.5, 0.5), "B": (0.5, 0.5, 0.5)}
    with pytest.raises(ValueError, match="category"):
        bga_category_pair_similarity(ok, "chem")
    with pytest.raises(ValueError, match=r"outside \[0, 1\]"):
        bga_category_pair_similarity(
            {"A": (1.5, 0.0, 0.0), "B": (0.0, 0.0, 0.0)}, "bio"
        )
    with pytest.raises(ValueError, match="at least 2"):
        bga_category_pair_similarity({"A": (0.5, 0.5, 0.5)}, "bio")


def test_pair_vector_validation():
    idx = PairIndex.from_site_ids(["A", "B", "C"])
    with pytest.raises(ValueError, match="values for"):
        PairVector(index=idx, values=np.array([1.0, 2.0]))
    with pytest.raises(ValueError, match="finite"):
        PairVector(index=idx, values=np.array([1.0, np.nan, 0.0]))


def test_pair_vector_csv(tmp_path):
    idx = PairIndex.from_site_ids(["A", "B", "C"])
    pv = PairVector(index=idx, values=np.array([0.1, 0.5, -1.0]))
    path = tmp_path / "pairs.csv"
    write_pair_vector_csv(pv, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "site_i,site_j,value"
    assert lines[1] == "A,B,0.10000000000000001"
    assert lines[3] == "B,C,-1"
    assert len(lines) == 4

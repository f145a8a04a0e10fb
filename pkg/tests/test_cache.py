from pslab.subprocesses.cache_utils import GroebnerCache
from pslab.subprocesses.commutative.multilin import balanced_dim, multilinearize


def test_store_and_load(cache):
    payload = {"kind": "test", "generators": ["x^2"]}
    assert cache.load(payload) is None
    cache.store(payload, {"elements": [[[[2], "1"]]]})
    assert cache.load(payload) == {"elements": [[[[2], "1"]]]}
    assert (cache.hits, cache.misses) == (1, 1)
    assert cache.load({"kind": "test", "generators": ["x^3"]}) is None


def test_entries_are_whole_files(cache):
    cache.store({"kind": "test"}, {"value": 1})
    files = list(cache.directory.glob("*/*.json"))
    assert len(files) == 1
    assert not list(cache.directory.glob("*/.tmp-*"))


def test_foreign_file_is_ignored(cache):
    payload = {"kind": "test"}
    cache.store(payload, {"value": 1})
    (path,) = cache.directory.glob("*/*.json")
    path.write_text("not json", encoding="utf-8")
    assert cache.load(payload) is None


def test_clear(cache):
    cache.store({"kind": "a"}, {})
    cache.store({"kind": "b"}, {})
    cache.clear()
    assert not list(cache.directory.glob("*/*.json"))


def test_results_do_not_depend_on_the_cache(algebra, tmp_path):
    pres = algebra("finite_points")
    uncached = [balanced_dim(multilinearize(pres, 3), t) for t in range(3)]
    cache = GroebnerCache(tmp_path / "shared")
    cold = [balanced_dim(multilinearize(pres, 3, cache=cache), t) for t in range(3)]
    warm = [balanced_dim(multilinearize(pres, 3, cache=cache), t) for t in range(3)]
    assert uncached == cold == warm
    assert cache.hits >= 1

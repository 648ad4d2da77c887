import io
import json
import tarfile
import threading

import numpy as np
import pytest

from sgwt_denoise import FormatError, SparseGraph, TransportError, ValidationError
from sgwt_denoise.ssmc import (
    BUNDLE_VERSION,
    GraphBundle,
    GraphSource,
    archive_url,
    bundle_from_archive,
    download_graph,
    load_bundle,
    save_bundle,
)


def _targz(files):
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w:gz") as tar:
        for name, data in files.items():
            info = tarfile.TarInfo(name)
            info.size = len(data)
            tar.addfile(info, io.BytesIO(data))
    return buf.getvalue()


def _bundle_files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_archive_url():
    assert archive_url("AG-Monien", "grid1", "http://x/") == "http://x/MM/AG-Monien/grid1.tar.gz"


def test_download_grid1(fixture_server, tmp_path):
    b = download_graph("AG-Monien", "grid1", cache_dir=tmp_path, base=fixture_server.url)
    assert b.graph.dims == (252, 252, 476)
    assert b.xy.shape == (252, 2)
    np.testing.assert_allclose(b.xy[:3], [[0, 0], [2.88763, 3.85355], [3.14645, 4.11237]], atol=5e-6)
    assert b.sA.nnz == 952
    assert "AG-Monien/grid1" in b.info
    assert b.info.startswith("%")
    assert b.source == GraphSource("AG-Monien", "grid1", f"{fixture_server.url}/MM/AG-Monien/grid1.tar.gz")
    assert (tmp_path / "AG-Monien" / "grid1.tar.gz").exists()
    assert fixture_server.requests == ["/MM/AG-Monien/grid1.tar.gz"]


def test_cache_idempotent(fixture_server, tmp_path):
    a = download_graph("AG-Monien", "grid1", cache_dir=tmp_path, base=fixture_server.url)
    files_a = _bundle_files(a.cached_at)
    b = download_graph("AG-Monien", "grid1", cache_dir=tmp_path, base=fixture_server.url)
    assert len(fixture_server.requests) == 1
    assert _bundle_files(b.cached_at) == files_a
    assert (a.graph.weights != b.graph.weights).nnz == 0
    np.testing.assert_array_equal(a.xy, b.xy)
    assert a.info == b.info


def test_concurrent_downloads_fetch_once(fixture_server, tmp_path):
    results, errors = [], []

    def worker():
        try:
            results.append(download_graph("AG-Monien", "grid1", cache_dir=tmp_path, base=fixture_server.url))
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len(fixture_server.requests) == 1
    assert all(r.graph.dims == (252, 252, 476) for r in results)


def test_unknown_graph_404(fixture_server, tmp_path):
    with pytest.raises(TransportError) as info:
        download_graph("AG-Monien", "nope", cache_dir=tmp_path, base=fixture_server.url)
    assert info.value.status == 404


def test_unreachable_host(tmp_path):
    with pytest.raises(TransportError) as info:
        download_graph("G", "x", cache_dir=tmp_path, base="http://127.0.0.1:9", timeout=2)
    assert info.value.status is None


def test_invalid_key(tmp_path):
    with pytest.raises(ValidationError):
        download_graph("..", "x", cache_dir=tmp_path)


def test_archive_without_matrix(tmp_path):
    data = _targz({"foo/readme.txt": b"hi"})
    with pytest.raises(FormatError, match="foo.mtx"):
        bundle_from_archive(data, "G", "foo", "u", tmp_path)


def test_corrupt_archive(tmp_path):
    with pytest.raises(FormatError, match="corrupt archive"):
        bundle_from_archive(b"not a tarball", "G", "foo", "u", tmp_path)


def test_invalid_graph_keeps_raw_archive(tmp_path):
    mtx = b"%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1.0\n"
    src = tmp_path / "srv" / "MM" / "G"
    src.mkdir(parents=True)
    (src / "asym.tar.gz").write_bytes(_targz({"asym/asym.mtx": mtx}))
    from conftest import FixtureServer

    cache = tmp_path / "cache"
    with FixtureServer(tmp_path / "srv") as srv:
        with pytest.raises(ValidationError, match="not symmetric"):
            download_graph("G", "asym", cache_dir=cache, base=srv.url)
    assert (cache / "G" / "asym.tar.gz").read_bytes() == (src / "asym.tar.gz").read_bytes()
    assert not (cache / "G" / "asym" / "meta.json").exists()


def test_coord_fallback_and_absent(tmp_path):
    mtx = b"%%MatrixMarket matrix coordinate pattern symmetric\n2 2 1\n2 1\n"
    xy = b"%%MatrixMarket matrix array real general\n2 2\n0\n1\n0\n0\n"
    b = bundle_from_archive(_targz({"e/e.mtx": mtx, "e/e_coords_v2.mtx": xy}), "G", "e", "u", tmp_path)
    np.testing.assert_array_equal(b.xy, [[0, 0], [1, 0]])
    b = bundle_from_archive(_targz({"e/e.mtx": mtx}), "G", "e", "u", tmp_path)
    assert b.xy is None


def test_bundle_round_trip(grid1_bundle, tmp_path):
    save_bundle(grid1_bundle, tmp_path / "b")
    back = load_bundle(tmp_path / "b")
    g0, g1 = grid1_bundle.graph, back.graph
    assert g1.dims == (252, 252, 476)
    a, b = g0.weights.tocoo(), g1.weights.tocoo()
    assert a.nnz == b.nnz == 952
    assert (g0.weights != g1.weights).nnz == 0
    np.testing.assert_array_equal(g0.coords, g1.coords)
    assert g0.coords.tobytes() == g1.coords.tobytes()
    assert g0.info.encode() == g1.info.encode()
    assert back.source == grid1_bundle.source


def test_bundle_without_coords(tmp_path):
    g = SparseGraph.from_dense([[0, 0.1 + 0.2], [0.1 + 0.2, 0]], info="line one\r\nline two\n")
    bundle = GraphBundle(g, GraphSource("G", "k2", "u"), tmp_path)
    save_bundle(bundle, tmp_path / "k2")
    back = load_bundle(tmp_path / "k2")
    assert back.xy is None and not (tmp_path / "k2" / "coords.csv").exists()
    assert back.graph.weights[0, 1] == 0.1 + 0.2
    assert back.info == "line one\r\nline two\n"


def test_bundle_versioning(grid1_bundle, tmp_path):
    path = save_bundle(grid1_bundle, tmp_path / "b")
    meta = json.loads((path / "meta.json").read_text())
    assert meta["format_version"] == BUNDLE_VERSION
    meta["format_version"] = BUNDLE_VERSION + 1
    (path / "meta.json").write_text(json.dumps(meta))
    with pytest.raises(FormatError, match="version"):
        load_bundle(path)


def test_bundle_corrupt_meta(grid1_bundle, tmp_path):
    path = save_bundle(grid1_bundle, tmp_path / "b")
    (path / "meta.json").write_text('{\n  "format_version": 1,\n  oops\n}\n')
    with pytest.raises(FormatError) as info:
        load_bundle(path)
    assert info.value.line == 3


@pytest.mark.network
def test_live_grid1(tmp_path):
    b = download_graph("AG-Monien", "grid1", cache_dir=tmp_path)
    assert b.graph.dims == (252, 252, 476)
    np.testing.assert_allclose(b.xy[:3], [[0, 0], [2.88763, 3.85355], [3.14645, 4.11237]], atol=5e-6)

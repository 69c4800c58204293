import json
import struct

import numpy as np
import pytest

from sketchlab.harness import (
    CSV_COLUMNS,
    ExperimentSpec,
    SpecError,
    TnsParseError,
    decode_tensor,
    emit_results,
    encode_tensor,
    gen_lowrank_matrix,
    gen_lowtubal_tensor,
    load_tensor_file,
    read_csv,
    run_data_tensor_comparison,
    run_matrix_experiment,
    run_tensor_experiment,
    save_tensor_file,
    scale_to_frobenius,
    to_csv,
    to_svg,
)
from sketchlab.harness.cli import main
from sketchlab.linalg_core import Seed, numerical_rank, sample_complex_gaussian
from sketchlab.tproduct import tensor_frobenius, tubal_rank


# -- data generation ----------------------------------------------------------

def test_gen_lowrank():
    assert not np.any(gen_lowrank_matrix(6, 5, 0, Seed(1)))
    assert numerical_rank(gen_lowrank_matrix(6, 5, 5, Seed(1))) == 5
    assert numerical_rank(gen_lowrank_matrix(100, 100, 10, Seed(2)), 1e-10) == 10
    with pytest.raises(ValueError):
        gen_lowrank_matrix(4, 3, 4, Seed(1))


def test_gen_lowtubal():
    assert not np.any(gen_lowtubal_tensor(5, 5, 3, 0, Seed(1)))
    t = gen_lowtubal_tensor(7, 6, 1, 3, Seed(4))
    assert np.allclose(t[:, :, 0], gen_lowrank_matrix(7, 6, 3, Seed(4)), atol=1e-13)
    assert tubal_rank(gen_lowtubal_tensor(20, 20, 4, 5, Seed(5))) == 5


def test_scale_to_frobenius():
    m = sample_complex_gaussian(5, 4, Seed(1))
    assert not np.any(scale_to_frobenius(m, 0))
    unit = m / np.linalg.norm(m)
    assert np.allclose(scale_to_frobenius(unit, 1.0), unit, rtol=1e-12, atol=0)
    assert np.linalg.norm(scale_to_frobenius(m, 0.37)) == pytest.approx(0.37, rel=1e-12)
    t = gen_lowtubal_tensor(3, 3, 2, 1, Seed(2))
    assert tensor_frobenius(scale_to_frobenius(t, 2.5)) == pytest.approx(2.5, rel=1e-12)
    with pytest.raises(ValueError):
        scale_to_frobenius(np.zeros((2, 2)), 1.0)


# -- spec validation ----------------------------------------------------------

def test_spec_violations_listed():
    spec = ExperimentSpec(trials=0, r_list=[], eps1_grid=[], noise_mode="bogus")
    with pytest.raises(SpecError) as exc:
        spec.validate()
    v = exc.value.violations
    assert len(v) >= 4
    assert any("trials" in x for x in v) and any("noise_mode" in x for x in v)


# -- experiments --------------------------------------------------------------

def small_matrix_spec(**kw):
    base = dict(kind="matrix", n1=30, n2=30, r0=3, r_list=[5], eps1_grid=[0.0],
                eps2_grid=[0.0], trials=3, master_seed=11)
    base.update(kw)
    return ExperimentSpec(**base)


def test_matrix_experiment_noiseless():
    res = run_matrix_experiment(small_matrix_spec(r_list=[3, 4, 8, 30]))
    assert len(res.rows) == 4
    assert all(row["median_rel_err"] <= 1e-8 for row in res.rows)


def test_single_trial_single_record():
    res = run_matrix_experiment(small_matrix_spec(trials=1))
    assert len(res.records) == 1 and len(res.rows) == 1
    assert set(res.rows[0]) == set(CSV_COLUMNS)


def test_grid_row_count():
    res = run_matrix_experiment(small_matrix_spec(eps1_grid=[0.01, 0.1], eps2_grid=[0.01, 0.1]))
    assert len(res.rows) == 4
    assert len(to_csv(res.rows).strip().splitlines()) == 5


def test_monotone_in_eps1():
    res = run_matrix_experiment(small_matrix_spec(
        r_list=[8], eps1_grid=[1e-4, 1e-3, 1e-2, 1e-1], eps2_grid=[0.0], trials=15))
    med = [row["median_rel_err"] for row in res.rows]
    assert all(b >= a * 0.95 for a, b in zip(med, med[1:]))


def test_records_reproducible_and_worker_independent():
    spec = small_matrix_spec(eps1_grid=[0.01, 0.1], eps2_grid=[0.05], trials=4)
    a = run_matrix_experiment(spec)
    spec.workers = 4
    b = run_matrix_experiment(spec)
    assert to_csv(a.rows) == to_csv(b.rows)
    assert [r.abs_err_frobenius for r in a.records] == [r.abs_err_frobenius for r in b.records]


def test_tensor_experiment_and_sweep():
    spec = ExperimentSpec(kind="tensor", n1=15, n2=15, n3=3, r0=2, r_list=[4, 6],
                          eps1_grid=[0.0], eps2_grid=[0.0], trials=3, master_seed=5,
                          n3_list=[1, 2, 4])
    res = run_tensor_experiment(spec)
    grid = [row for row in res.rows if row["kind"] == "tensor"]
    sweep = [row for row in res.rows if row["kind"] == "tensor-n3-sweep"]
    assert all(row["median_rel_err"] <= 1e-8 for row in grid)
    assert len(sweep) == 2 * 3
    assert {(row["r"], row["n3"]) for row in sweep} == {(r, n) for r in (4, 6) for n in (1, 2, 4)}


def test_tensor_n3_one_matches_matrix():
    common = dict(n1=20, n2=20, r0=2, r_list=[5], eps1_grid=[0.01], eps2_grid=[0.02],
                  trials=3, master_seed=8)
    m = run_matrix_experiment(ExperimentSpec(kind="matrix", **common))
    t = run_tensor_experiment(ExperimentSpec(kind="tensor", n3=1, **common))
    for a, b in zip(m.records, t.records):
        assert abs(a.abs_err_frobenius - b.abs_err_frobenius) <= 1e-10
    assert m.rows[0]["median_rel_err"] == pytest.approx(t.rows[0]["median_rel_err"], abs=1e-10)


def test_wrong_kind_rejected():
    with pytest.raises(SpecError):
        run_matrix_experiment(small_matrix_spec(kind="tensor"))


# -- TNS1 files ---------------------------------------------------------------

def test_tns_roundtrip(tmp_path):
    t = gen_lowtubal_tensor(4, 3, 5, 2, Seed(1))
    p = tmp_path / "t.tns"
    save_tensor_file(t, p)
    back = load_tensor_file(p)
    assert back.tobytes() == t.tobytes()


def test_tns_real_roundtrip(tmp_path):
    t = np.arange(24, dtype=float).reshape(2, 3, 4)
    p = tmp_path / "r.tns"
    save_tensor_file(t, p)
    assert p.read_bytes()[4] == 0
    assert np.array_equal(load_tensor_file(p), t)


def test_tns_hand_encoded_fixture():
    # 2x2x2 real tensor; payload order: slice 1 row-major, then slice 2
    header = b"TNS1" + bytes([0]) + struct.pack("<3I", 2, 2, 2)
    payload = struct.pack("<8d", 1, 2, 3, 4, 5, 6, 7, 8)
    t = decode_tensor(header + payload)
    assert t.shape == (2, 2, 2)
    assert np.array_equal(t[:, :, 0].real, [[1, 2], [3, 4]])
    assert np.array_equal(t[:, :, 1].real, [[5, 6], [7, 8]])
    # complex: one entry, interleaved re, im
    c = decode_tensor(b"TNS1\x01" + struct.pack("<3I", 1, 1, 1) + struct.pack("<2d", 1.5, -2.0))
    assert c[0, 0, 0] == 1.5 - 2j
    assert encode_tensor(t) == header + payload


@pytest.mark.parametrize("buf,offset", [
    (b"", 0),
    (b"XXXX\x00" + struct.pack("<3I", 1, 1, 1) + b"\0" * 8, 0),
    (b"TNS1\x07" + struct.pack("<3I", 1, 1, 1) + b"\0" * 8, 4),
    (b"TNS1\x00" + struct.pack("<3I", 2, 2, 2) + b"\0" * 8, 25),
    (b"TNS1\x00" + struct.pack("<3I", 2**20, 2**20, 2**10), 5),
    (b"TNS1\x00" + struct.pack("<3I", 1, 1, 1) + b"\0" * 9, 25),
])
def test_tns_parse_errors(buf, offset):
    with pytest.raises(TnsParseError) as exc:
        decode_tensor(buf)
    assert exc.value.offset == offset


# -- emission -----------------------------------------------------------------

def test_empty_csv_is_header_only():
    assert to_csv([]) == ",".join(CSV_COLUMNS) + "\n"


def test_csv_roundtrip_full_precision():
    res = run_matrix_experiment(small_matrix_spec(eps1_grid=[0.01, 1 / 3], eps2_grid=[0.02, 0.1]))
    back = read_csv(to_csv(res.rows))
    assert len(back) == 4
    for a, b in zip(res.rows, back):
        assert a == b


def test_json_and_svg(tmp_path):
    res = run_matrix_experiment(small_matrix_spec(eps1_grid=[0.01, 0.1], eps2_grid=[0.01, 0.1]))
    emit_results(res.rows, "json", tmp_path / "r.json", res.metadata)
    data = json.loads((tmp_path / "r.json").read_text())
    assert len(data["rows"]) == 4 and data["metadata"]["field_mode"] == "complex-target"
    emit_results(res.rows, "svg", tmp_path / "r.svg")
    svg = (tmp_path / "r.svg").read_text()
    assert svg.startswith("<?xml") and "<svg" in svg


# -- data comparison ----------------------------------------------------------

def test_data_compare_synthetic(tmp_path):
    t = gen_lowtubal_tensor(20, 18, 4, 3, Seed(3), mode="real").real
    p = tmp_path / "d.tns"
    save_tensor_file(t, p)
    rep = run_data_tensor_comparison(p, r=6, eps1=0.0, eps2=0.0, seed=1)
    s = rep["strategies"]
    assert s["tensor"]["error_frobenius"] <= 1e-8
    assert s["tensor"]["sketch_matrix_count"] == 1
    assert s["slicewise-shared"]["sketch_matrix_count"] == 1
    assert s["slicewise-fresh"]["sketch_matrix_count"] == 4
    assert s["slicewise-fresh"]["sketch_matrix_bytes"] == 4 * s["tensor"]["sketch_matrix_bytes"]
    assert rep["real_target"] and s["tensor"]["imag_frobenius"] is not None
    noisy = run_data_tensor_comparison(p, r=6, eps1=0.01, eps2=0.01, seed=1)
    assert sorted(noisy["error_ordering"]) == sorted(s)


# -- CLI ----------------------------------------------------------------------

def test_cli_matrix_exp(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code = main(["matrix-exp", "--n1", "20", "--n2", "20", "--r0", "2", "--r", "4",
                 "--eps1", "0.01", "--eps2", "0.01", "--trials", "2", "--seed", "3",
                 "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_cli_seed_required():
    with pytest.raises(SystemExit) as exc:
        main(["matrix-exp"])
    assert exc.value.code == 2


def test_cli_spec_failure(capsys):
    assert main(["matrix-exp", "--trials", "0", "--seed", "1"]) == 2


def test_cli_tensor_exp_json(tmp_path):
    out = tmp_path / "t.json"
    code = main(["tensor-exp", "--n1", "12", "--n2", "12", "--n3", "2", "--r0", "2",
                 "--r", "4", "--eps1", "0", "--eps2", "0", "--trials", "2", "--seed", "1",
                 "--n3-list", "1", "2", "--format", "json", "--out", str(out)])
    assert code == 0
    rows = json.loads(out.read_text())["rows"]
    assert len(rows) == 3


def test_cli_bound(capsys):
    assert main(["bound", "--n1", "100", "--r", "20", "--r-low", "10", "--delta2", "0.2",
                 "--z-norm", "0.01", "--z-tilde-norm", "0.01"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["output"]["valid"]
    assert main(["bound", "--n1", "100", "--r", "20", "--r-low", "10", "--delta2", "0.05"]) == 2


def test_cli_gen_tensor_and_compare(tmp_path):
    p = tmp_path / "g.tns"
    assert main(["gen-tensor", "--n1", "10", "--n2", "9", "--n3", "3", "--r0", "2",
                 "--seed", "4", "--out", str(p)]) == 0
    t = load_tensor_file(p)
    assert t.shape == (10, 9, 3) and tubal_rank(t) == 2
    out = tmp_path / "c.json"
    assert main(["data-compare", str(p), "--r", "4", "--seed", "1", "--out", str(out)]) == 0
    assert set(json.loads(out.read_text())["strategies"]) == {
        "tensor", "slicewise-fresh", "slicewise-shared"}


def test_cli_io_failure(tmp_path):
    bad = tmp_path / "bad.tns"
    bad.write_bytes(b"nope")
    assert main(["data-compare", str(bad), "--r", "2", "--seed", "1"]) == 4
    assert main(["data-compare", str(tmp_path / "missing.tns"), "--r", "2", "--seed", "1"]) == 4


def test_cli_validate_lemmas(tmp_path):
    out = tmp_path / "v.json"
    assert main(["validate-lemmas", "--samples", "50", "--seed", "2", "--square-n", "8",
                 "--gordon-m", "20", "--gordon-n", "5", "--haar-n", "8", "--haar-r", "2",
                 "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["reports"]) == 3

import csv
import subprocess
import sys

import numpy as np
import pytest

from apack import container, synth
from apack.cli import main


def gen(tmp_path, spec, count, seed=0, name=None):
    path = tmp_path / (name or f"{spec.split(':')[0]}-{count}-{seed}.bin")
    assert main(["gen", spec, str(count), "--seed", str(seed), "--out", str(path)]) == 0
    return path


def compress(src, out, *extra):
    return main(["compress", str(src), "--out", str(out), *extra])


def ratio_from(output):
    fields = dict(kv.split("=") for kv in output.split())
    return float(fields["ratio"])


def test_profile_weights(tmp_path, capsys):
    src = gen(tmp_path, "two-cluster:0.5,4,0", 5000)
    out = tmp_path / "w.tbl"
    assert main(["profile", str(src), "--out", str(out)]) == 0
    table = container.read_table(out.read_bytes())
    assert 0 in table.counts  # weights mode keeps zero-count rows
    assert "v_min" in capsys.readouterr().out


def test_profile_activations(tmp_path):
    samples = [gen(tmp_path, "two-cluster:0.5,4", 2000, seed=s) for s in range(9)]
    out = tmp_path / "a.tbl"
    assert main(["profile", *map(str, samples), "--mode", "activations", "--out", str(out)]) == 0
    assert min(container.read_table(out.read_bytes()).counts) >= 1


def test_profile_empty_input(tmp_path, capsys):
    empty = tmp_path / "empty.bin"
    empty.write_bytes(b"")
    assert main(["profile", str(empty), "--out", str(tmp_path / "t.tbl")]) == 1
    assert "EmptyHistogram" in capsys.readouterr().err


def test_compress_all_zero(tmp_path, capsys):
    src = tmp_path / "zeros.bin"
    src.write_bytes(bytes(1 << 20))
    out = tmp_path / "zeros.apk"
    assert compress(src, out) == 0
    assert ratio_from(capsys.readouterr().out) > 50
    assert main(["verify", str(src), str(out)]) == 0


def test_compress_uniform(tmp_path, capsys):
    src = gen(tmp_path, "uniform", 1 << 18)
    out = tmp_path / "u.apk"
    assert compress(src, out) == 0
    assert 0.95 <= ratio_from(capsys.readouterr().out) <= 1.01


def test_compress_with_uncovering_table(tmp_path, capsys):
    narrow = gen(tmp_path, "constant:3", 100)
    table = tmp_path / "narrow.tbl"
    assert main(["profile", str(narrow), "--out", str(table)]) == 0
    src = tmp_path / "wide.bin"
    src.write_bytes(bytes([3, 3, 200]))
    assert compress(src, tmp_path / "x.apk", "--table", str(table)) == 1
    err = capsys.readouterr().err
    assert "ZeroProbabilitySymbol" in err and "0xC8" in err


def test_decompress_roundtrip(tmp_path):
    src = gen(tmp_path, "sparse:0.9", 30_000)
    packed, restored = tmp_path / "s.apk", tmp_path / "s.out"
    assert compress(src, packed, "--chunk-size", "1000") == 0
    assert main(["decompress", str(packed), "--out", str(restored)]) == 0
    assert restored.read_bytes() == src.read_bytes()


def test_decompress_corrupted_payload(tmp_path, capsys):
    src = gen(tmp_path, "two-cluster:0.5,4", 20_000)
    packed = tmp_path / "c.apk"
    assert compress(src, packed) == 0
    blob = bytearray(packed.read_bytes())
    first_payload = container.HEADER_SIZE + 8 * container.num_chunks_for(20_000, 4096)
    for k in range(first_payload, first_payload + 64):
        blob[k] ^= 0xFF
    packed.write_bytes(bytes(blob))
    code = main(["decompress", str(packed), "--out", str(tmp_path / "c.out")])
    err = capsys.readouterr().err
    if code == 0:
        # damage that still decodes must at least fail verification
        assert main(["verify", str(src), str(packed)]) == 1
    else:
        assert code == 3 and "CorruptStream" in err


def test_decompress_bad_version(tmp_path, capsys):
    src = gen(tmp_path, "uniform", 100)
    packed = tmp_path / "v.apk"
    assert compress(src, packed) == 0
    blob = bytearray(packed.read_bytes())
    blob[4] = 7
    packed.write_bytes(bytes(blob))
    assert main(["decompress", str(packed), "--out", str(tmp_path / "v.out")]) == 3
    assert "unsupported version" in capsys.readouterr().err


def test_verify(tmp_path, capsys):
    src = gen(tmp_path, "two-cluster:0.5,4", 5000)
    packed = tmp_path / "p.apk"
    assert compress(src, packed) == 0
    capsys.readouterr()
    assert main(["verify", str(src), str(packed)]) == 0
    assert "pass" in capsys.readouterr().out
    altered = bytearray(src.read_bytes())
    altered[1234] ^= 1
    other = tmp_path / "altered.bin"
    other.write_bytes(bytes(altered))
    assert main(["verify", str(other), str(packed)]) == 1
    assert "offset 1234" in capsys.readouterr().out
    assert main(["verify", str(tmp_path / "missing.bin"), str(packed)]) == 3


def test_report_csv(tmp_path, capsys):
    files = [gen(tmp_path, "two-cluster:0.5,4", 20_000, seed=s) for s in range(2)]
    out_csv = tmp_path / "r.csv"
    assert main(["report", *map(str, files), "--csv", str(out_csv)]) == 0
    assert "geomean" in capsys.readouterr().out
    rows = list(csv.DictReader(out_csv.open()))
    assert [r["name"] for r in rows] == [str(f) for f in sorted(files)] + ["GEOMEAN"]
    for r in rows[:-1]:
        assert float(r["apack_ratio"]) == pytest.approx(int(r["original_bits"]) / float(r["apack_bits"]), rel=1e-5)
        assert float(r["apack_ratio"]) > float(r["shapeshifter_ratio"]) > 1.0


def test_report_activation_groups(tmp_path):
    files = [gen(tmp_path, "sparse:0.5", 3000, seed=s) for s in range(4)]
    out_csv = tmp_path / "r.csv"
    assert main(["report", *map(str, files), "--mode", "activations", "--samples", "2", "--csv", str(out_csv)]) == 0
    assert len(list(csv.DictReader(out_csv.open()))) == 5


def test_gen_deterministic(tmp_path):
    a = gen(tmp_path, "two-cluster:0.3,8", 1000, seed=4, name="a.bin")
    b = gen(tmp_path, "two-cluster:0.3,8", 1000, seed=4, name="b.bin")
    c = gen(tmp_path, "two-cluster:0.3,8", 1000, seed=5, name="c.bin")
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()
    assert len(a.read_bytes()) == 1000


def test_gen_custom_histogram(tmp_path):
    weights = tmp_path / "w.txt"
    weights.write_text(" ".join(["0"] * 10 + ["1"] + ["0"] * 245))
    out = gen(tmp_path, f"hist:{weights}", 50)
    assert out.read_bytes() == bytes([10] * 50)


@pytest.mark.parametrize("spec", ["bogus", "constant:300", "two-cluster:0.5,1.5", "sparse:2"])
def test_gen_bad_spec(tmp_path, spec, capsys):
    assert main(["gen", spec, "10", "--out", str(tmp_path / "x")]) == 2


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        main(["compress", "x", "--out", "y", "--chunk-size", "0"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main([])


@pytest.mark.parametrize("spec", ["uniform", "constant:0", "two-cluster:0.5,4", "sparse:0.9"])
def test_pipeline(tmp_path, spec):
    count = 9000
    src = gen(tmp_path, spec, count)
    for chunk in (1, 7, 4096, count):
        packed, restored = tmp_path / f"{chunk}.apk", tmp_path / f"{chunk}.out"
        assert compress(src, packed, "--chunk-size", str(chunk)) == 0
        assert main(["decompress", str(packed), "--out", str(restored)]) == 0
        assert restored.read_bytes() == src.read_bytes()


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.bin"
    proc = subprocess.run(
        [sys.executable, "-m", "apack", "gen", "constant:5", "4", "--out", str(out)], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_bytes() == b"\x05" * 4
    assert np.array_equal(synth.generate("constant:5", 4), np.frombuffer(out.read_bytes(), np.uint8))

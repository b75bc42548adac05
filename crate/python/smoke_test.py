"""Build the extension with cargo and exercise it from Python."""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

F1 = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, 1], [0, -1]], "max_cones": [[0, 1], [1, 2], [2, 3], [3, 0]]}
P2 = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [2, 0]]}


def build():
    subprocess.run(["cargo", "build", "--release", "-p", "torimmp-py"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "release" / "libtorimmp.so"
    out = Path(tempfile.mkdtemp())
    shutil.copy(lib, out / "torimmp.so")
    sys.path.insert(0, str(out))


def main():
    build()
    import torimmp as t

    half = t.Scalar("1/2")
    assert str(half + half) == "1"
    assert t.Scalar("sqrt(2)") * t.Scalar("sqrt(2)") == t.Scalar("2")

    assert t.validate(json.dumps(P2)) == (True, True, True)
    try:
        t.validate('{"rank": 2}')
    except ValueError:
        pass
    else:
        raise AssertionError("bad fan accepted")

    trace = json.loads(t.mori(json.dumps(F1), strategy="divisorial-first"))
    assert [s["action"]["kind"] for s in trace["steps"]] == ["divisorial", "fibering"]
    assert trace["outcome"] == "MoriFiberSpace"

    minus_k = json.dumps({"coeffs": {"0": "1", "1": "1", "2": "1", "3": "1"}})
    trace = json.loads(t.scale(json.dumps(F1), minus_k, "1"))
    assert len(trace["steps"]) == 1 and trace["outcome"] == "MoriFiberSpace"

    c, _ = t.mori_fiber_space(json.dumps(P2), json.dumps({"coeffs": {"0": "1"}}))
    assert c == t.Scalar("3")

    inst = json.dumps({"m": [i // 2 for i in range(1, 21)], "b": "1/2", "d": "1/2"})
    assert t.saturate(inst) == (True, t.Scalar("1/2"))
    kind, d, j = t.rationality(inst)
    assert (kind, str(d), j) == ("rational", "1/2", 2)

    assert sorted(t.hilbert_basis_2d([1, 0], [1, 2])) == [[1, 0], [1, 1], [1, 2]]
    assert t.cox_ring(json.dumps(F1)) == (4, 2, True)

    rows = t.suite(1, 3, 2)
    assert rows and all(r[2] for r in rows)
    try:
        t.minimal_model(json.dumps(F1))
    except t.TorimmpError as e:
        assert "not big" in str(e)
    else:
        raise AssertionError("non-big pair accepted")
    print("python smoke test passed")


if __name__ == "__main__":
    main()

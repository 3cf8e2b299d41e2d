import os
import subprocess
import sys
import textwrap

SCRIPT = textwrap.dedent("""
    from lengthspec import _jit
    from lengthspec.forms import class_numbers, cycles
    from lengthspec.lfunc import l_value_direct, l_value_exact
    from lengthspec.spectrum import SubgroupDescriptor, build_table
    assert not _jit.HAVE_NUMBA
    ds = [d for d in range(5, 600) if d % 4 in (0, 1) and int(d ** 0.5) ** 2 != d]
    assert class_numbers(ds) == [len(cycles(d)) for d in ds]
    assert abs(l_value_direct(1001) - l_value_exact(1001)) < 1e-10
    print(",".join(str(r.m) for r in build_table(SubgroupDescriptor(), 60)))
""")


def _run(flag):
    env = dict(os.environ, LENGTHSPEC_NO_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", SCRIPT if flag == "1" else SCRIPT.replace("not _jit", "_jit")],
                         env=env, capture_output=True, text=True, timeout=600)
    assert res.returncode == 0, res.stderr
    return res.stdout


def test_pure_python_path_agrees_with_numba():
    assert _run("1") == _run("0")


def test_benchmark_runs():
    bench = os.path.join(os.path.dirname(__file__), "..", "benchmarks", "bench_kernels.py")
    res = subprocess.run([sys.executable, bench, "--tmax", "60", "--repeat", "1"],
                         capture_output=True, text=True, timeout=600)
    assert res.returncode == 0, res.stderr
    assert "outputs identical" in res.stdout

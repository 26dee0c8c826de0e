#!/usr/bin/env python3
"""Smoke test for the cadmrg_py extension module.

Imports the module from an installed location if available, otherwise
from the cargo build tree (run `cargo build -p cadmrg-py` first).
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def import_module():
    try:
        import cadmrg_py  # noqa: F401
        return cadmrg_py
    except ImportError:
        pass
    for profile in ("debug", "release"):
        so = ROOT / "target" / profile / "libcadmrg_py.so"
        if so.exists():
            tmp = tempfile.mkdtemp(prefix="cadmrg_py_")
            shutil.copy(so, pathlib.Path(tmp) / "cadmrg_py.so")
            sys.path.insert(0, tmp)
            import cadmrg_py
            return cadmrg_py
    sys.exit("cadmrg_py not found; run `cargo build -p cadmrg-py` first")


def main():
    cd = import_module()

    census = cd.gate_census()
    assert sum(census.values()) == 720, census
    assert census == {"local": 36, "cnot_class": 324, "swap_class": 360}, census
    print(f"gate census ok: {census}")

    h2 = ROOT / "data" / "h2.fcidump"
    e_fci = cd.fci_energy(str(h2))
    ham = cd.Hamiltonian.from_fcidump(str(h2))
    assert ham.n_qubits == 4
    r = cd.dmrg(ham, chi=4, restarts=2, min_sweeps=2, max_sweeps=10)
    assert abs(r.best_energy - e_fci) < 1e-8, (r.best_energy, e_fci)
    assert abs(ham.exact_energy() - e_fci) < 1e-8
    print(f"h2: fci {e_fci:.10f}, dmrg {r.best_energy:.10f}  ({r!r})")

    tfim = cd.Hamiltonian.tfim(10, 1.0, 1.0)
    exact = tfim.exact_energy()
    plain = cd.dmrg(tfim, chi=4, restarts=2, min_sweeps=3, max_sweeps=12)
    augmented = cd.cadmrg(tfim, chi=4, restarts=2, min_sweeps=3, max_sweeps=12)
    assert augmented.best_energy <= plain.best_energy + 1e-12
    assert augmented.best_energy >= exact - 1e-9
    assert all(not math.isnan(e) for e in augmented.energies)
    for sweep, bond, gate_id, gate_class in augmented.circuit:
        assert 1 <= bond < tfim.n_qubits and gate_id != 0
        assert gate_class in ("local", "cnot_class", "swap_class")
    print(
        f"tfim10: exact {exact:.10f}, dmrg {plain.best_energy:.10f}, "
        f"cadmrg {augmented.best_energy:.10f}, {len(augmented.circuit)} gates"
    )
    print("smoke test passed")


if __name__ == "__main__":
    main()

"""Simulation toolkit for levitated solid-neon electron qubits.

Modules:
    core          constants, materials, special-function kernels
    maglev        current-disk field maps and trap analysis
    ringfield     biased-ring electrostatics on the sphere
    vertical      surface-normal bound state and WKB extraction lifetime
    eigensolver   lateral eigenstates (trial basis + imaginary time)
    qubit         transition metrics and (Vr, H) sweeps
    coupling      dipole element, qubit-resonator g, two-qubit J
    laplace       differential-mode electrostatics (field per volt)
    cli           `levqsim` command-line entry point
"""

from .output import __version__

__all__ = ["__version__"]

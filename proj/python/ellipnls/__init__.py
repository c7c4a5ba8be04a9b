"""Elliptic-function solution family of the cubic NLS equation.

Thin Python layer over the C++ core (_ellipnls): Weierstrass evaluation,
the closed-form h/phi/f/Psi family, physicality constraints, residual
diagnostics, and the split-step cross-check.
"""

try:
    from . import _ellipnls as _core  # installed wheel layout
except ImportError:  # in-tree build: tests point sys.path at the build directory
    import _ellipnls as _core

globals().update({name: getattr(_core, name) for name in dir(_core) if not name.startswith("_")})
__version__ = _core.__version__

APPENDIX_PARAMS = _core.SolutionParams(a=-1.0, c1=-2.0, c2=0.4, c3=0.13, h0=0.0, f0=0.0,
                                       phi0=0.0)

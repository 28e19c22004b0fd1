"""Projected iterations for joint fixed-point / variational-inequality problems."""

try:
    from . import _vifp as _core  # installed layout: extension inside the package
except ImportError:  # build-tree layout: extension on sys.path
    import _vifp as _core

globals().update({k: v for k, v in vars(_core).items() if not k.startswith("_")})

__all__ = sorted(k for k in vars(_core) if not k.startswith("_"))

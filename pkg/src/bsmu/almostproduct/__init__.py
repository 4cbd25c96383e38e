from .version import __version__


__title__ = 'Almost Product'
__description__ = 'Verification lab for canonical connections on Riemannian almost product manifolds'

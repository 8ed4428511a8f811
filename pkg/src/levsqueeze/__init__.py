"""Squeezed-light control of recoil heating, scattering patterns and
displacement-detection sensitivity for optically levitated particles."""

__version__ = "0.1.0"

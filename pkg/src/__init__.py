"""zernq - Zernike-mode optics and two-photon entanglement toolkit"""
__version__ = "0.1.0"

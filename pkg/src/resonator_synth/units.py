"""Conversions between cyclic file units (GHz, MHz, ns) and angular SI."""
import numpy as np

TWO_PI = 2.0 * np.pi


def ghz(f):
    """Cyclic GHz -> rad/s."""
    return TWO_PI * f * 1e9


def mhz(f):
    """Cyclic MHz -> rad/s."""
    return TWO_PI * f * 1e6


def to_ghz(w):
    return w / (TWO_PI * 1e9)


def to_mhz(w):
    return w / (TWO_PI * 1e6)


def ns(t):
    return t * 1e-9


def to_ns(t):
    return t * 1e9

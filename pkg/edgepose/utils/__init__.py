"""Parameter dataclasses, profile loading and the numba shim"""

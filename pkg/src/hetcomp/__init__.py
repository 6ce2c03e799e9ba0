"""Coordinated multi-point zero-forcing in K-tier heterogeneous cellular networks.

Monte Carlo simulation of the end-user SIR under overhead delay and limited
feedback, plus closed-form SIR CDF bounds used as cross-checks.
"""
__version__ = "0.1.0"

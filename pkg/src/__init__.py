"""
Flexblock - dispatch an energy block with MPC and measure its flexibility.
"""

__version__ = "0.1.0"

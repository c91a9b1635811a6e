"""
RMST-based feature screening for high-dimensional survival data.
"""

__version__ = '1.0.0'

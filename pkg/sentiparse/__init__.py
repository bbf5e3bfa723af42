"""
SentiParse: structured sentiment analysis as transition-based
dependency parsing.
"""

__version__ = '1.0.0'

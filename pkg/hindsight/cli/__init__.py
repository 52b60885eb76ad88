"""
Hindsight command line interface
"""

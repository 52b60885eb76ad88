"""
Hindsight core: settings, exceptions, logging helpers and value types
"""

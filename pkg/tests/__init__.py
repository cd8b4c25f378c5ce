"""
polysub Tests.

Test suite for the polysub package.
"""

__description__ = """
clusterkit computational package.
Seeds, quantum tori, word seeds, pointed elements, triangular bases, the type A
minor oracle and good-subseed towers. The command line entry point is `clusterkit.py`.
"""

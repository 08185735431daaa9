__description__ = """
clusterkit support module.
Logging setup, runtime context, seed file I/O and quiver export.
"""

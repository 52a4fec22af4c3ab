"""
Version information for OpEntropy.
Follows Semantic Versioning 2.0.0 (https://semver.org/)
"""

from pathlib import Path

__version__ = "1.0.0"

LIBRARY_NAME = "opentropy"


def get_version() -> str:
    """
    Get the current version of the library.
    Reads from VERSION file if available, falls back to hardcoded version.
    """
    version_file = Path(__file__).parent.parent / "VERSION"
    try:
        if version_file.exists():
            return version_file.read_text().strip() or __version__
    except OSError:
        pass
    return __version__


def library_info() -> dict:
    """Name/version block embedded in every report."""
    return {'name': LIBRARY_NAME, 'version': get_version()}


VERSION = get_version()

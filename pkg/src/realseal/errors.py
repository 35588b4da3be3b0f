"""Exception hierarchy shared across the realseal modules."""


class RealSealError(Exception):
    """Base class for all realseal errors."""


class CaptureError(RealSealError):
    """Invalid capture data or a corrupt/incomplete capture directory."""


class ManifestError(RealSealError):
    """Manifest bytes are malformed, non-canonical, or out of range."""


class SidecarError(RealSealError):
    """Sidecar container bytes violate the .rsl layout."""


class RegistryError(RealSealError):
    """Registry file is malformed or an operation names an unknown device."""

from .ncrit import AsyncIdentityTester, IdentityTester

__version__ = "0.1.0"
__all__ = ["IdentityTester", "AsyncIdentityTester", "__version__"]

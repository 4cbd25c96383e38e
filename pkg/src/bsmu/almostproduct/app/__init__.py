from .app import AlmostProductApp

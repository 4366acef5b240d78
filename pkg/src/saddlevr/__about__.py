__author__ = "zrempz"
__version__ = "0.3.0"

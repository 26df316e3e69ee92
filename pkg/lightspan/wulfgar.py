"""Support test functions and doctests, in a module small enough to inline."""

from doctest import DocTestSuite, ELLIPSIS
from importlib import import_module
from unittest import TestCase
__unittest = 1  # Tell unittest not to include run() in test tracebacks.

def add_test_functions(loader, tests, module_name):
    """Collect every ``test_*`` function of a module as one TestCase."""

    def wrap(test):
        def run(self):
            return test()
        run.__doc__ = test.__doc__
        return run

    module = import_module(module_name)
    methods = dict((name, wrap(getattr(module, name)))
                   for name in sorted(dir(module))
                   if name.startswith('test_'))
    TestFunctions = type('TestFunctions', (TestCase,), methods)
    TestFunctions.__module__ = module_name
    tests.addTest(loader.loadTestsFromTestCase(TestFunctions))

def add_doctests(tests, module_names):
    """Run the docstring examples of each named module."""
    for name in module_names:
        tests.addTests(DocTestSuite(name, optionflags=ELLIPSIS))

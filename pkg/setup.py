from setuptools import setup

# Read the package's "__version__" and manual without importing it.
path = 'lightspan/__init__.py'
with open(path, 'rb') as f:
    text = f.read().decode('utf-8')
namespace = {}
eval(compile(text, path, 'exec'), namespace)
description, long_description = namespace['__doc__'].split('\n', 1)

setup(name = 'lightspan',
      version = namespace['__version__'],
      description = description,
      long_description = long_description,
      license = 'MIT',
      classifiers = [
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
        ],
      packages = ['lightspan'],
      scripts = ['bin/lightspan'],
      install_requires = ['numpy', 'scipy'],
      extras_require = {'test': ['networkx']},
)

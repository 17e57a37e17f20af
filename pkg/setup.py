from setuptools import setup

setup(name='acvar',
      version='0.1.0',
      author='acvar developers',
      description='Bundle-valued differential forms, integrability forms and variational functionals of almost-complex structures',
      package_dir={'': 'forms'},
      packages=['acvar', 'acvar.core', 'acvar.unittest'],
      install_requires=['numpy>=1.22.0',
                        'scipy>=1.12.0',
                        'numba>=0.55.2',
                        'pyyaml>=5.3.1',
                        'sympy>=1.9'],
      entry_points={'console_scripts': ['acvar = acvar.cli:main']}
      )

from setuptools import setup, find_packages

setup(
        name='patchr0',
        version='0.1.0',
        description=('Principal eigenvalues and basic reproduction ratios '
                     'of periodic cooperative patch models under dispersal'),
        packages=find_packages(exclude=('tests',)),
        python_requires='>=3.11',
        install_requires=('numpy',
                          'scipy',
                          'networkx',
                          'pandas',
                          'luigi'),
        package_data={'patchr0': ['bin/*.py', 'resources/*']},
        entry_points={'console_scripts': ['patchr0 = patchr0.cli:main']},
        zip_safe=False)

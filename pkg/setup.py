from os import path

from setuptools import setup, find_packages

import sentiparse

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='SentiParse',
    version=sentiparse.__version__,

    description='Structured sentiment analysis as dependency parsing',
    long_description=long_description,
    long_description_content_type='text/markdown',

    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',
        'Topic :: Text Processing :: Linguistic',

        # Versions of python supported
        'Programming Language :: Python :: 3',
    ],

    packages=find_packages(exclude=['docs', 'tests']),
    python_requires='>=3.8',

    install_requires=['torch>=2.0',
                      'numpy',
                      'scipy',
                      'recordclass',
                      'monotonic'],

    extras_require={
        'test': ['pytest'],
        'docs': ['sphinx', 'sphinx_rtd_theme'],
    },

    entry_points={
        'console_scripts': [
            'sentiparse = sentiparse.__main__:main'
        ]
    },
)

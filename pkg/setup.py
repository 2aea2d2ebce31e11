import os
from setuptools import setup


setup(name='pylevymlmc',
      version='0.1',
      description='Multilevel Monte Carlo with Gaussian correction for Levy-driven SDEs',
      long_description=open(os.path.join(os.path.dirname(__file__), 'README.md')).read(),
      long_description_content_type='text/markdown',
      classifiers=[
          "Development Status :: 4 - Beta",
          "Intended Audience :: Science/Research",
          "Programming Language :: Python :: 3",
          "Topic :: Scientific/Engineering",
          "Topic :: Scientific/Engineering :: Mathematics",
          "License :: OSI Approved :: MIT License",
      ],
      install_requires=['numpy>=1.17', 'scipy>=1.5'],
      tests_require=['pytest'],
      extras_require={'test': ['pytest']},
      include_package_data=True,
      license='MIT',
      packages=['pylevymlmc', 'pylevymlmc.experiment', 'pylevymlmc.experiment.util'],
      entry_points={'console_scripts': ['pylevymlmc = pylevymlmc.cli:main']},
      zip_safe=False)

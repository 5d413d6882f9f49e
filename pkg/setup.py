from setuptools import setup, find_packages

setup(
    name='crhlab',
    version='0.1.0',
    author='Marc Hadfield',
    author_email='marc@vital.ai',
    description='CRH Lab: alignment of representations, gradients and weights in small neural networks',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    url='https://github.com/vital-ai/crhlab',
    packages=find_packages(exclude=["test"]),
    package_data={'crhlab': ['presets/*.yaml']},
    license='Apache License 2.0',
    install_requires=[
            'numpy>=1.24',
            'scipy>=1.10',
            'pyyaml',
            'matplotlib',
            'tqdm'
    ],
    extras_require={
            'test': ['pytest>=7.0', 'hypothesis>=6.0'],
    },
    entry_points={
        'console_scripts': [
            'crhlab=crhlab.runner.cli:main',
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.10',
)

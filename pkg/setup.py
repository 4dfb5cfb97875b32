from setuptools import find_packages, setup

version = {}
with open("./minkowski_orbits/version/__init__.py") as fp:
    exec(fp.read())

requirements = []
with open('requirements.txt') as f:
    requirements = f.read().splitlines()

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name='minkowski-orbits',
    version=VERSION,
    packages=find_packages(exclude=['test', 'test.*']),
    install_requires=requirements,
    description="Heteroclinic, homoclinic and periodic orbits of the Minkowski-curvature equation "
                "with indefinite weight",
    long_description=long_description,
    long_description_content_type="text/markdown",
    zip_safe=True,
    entry_points='''
        [console_scripts]
        minkowski-orbits=minkowski_orbits:cli
    ''',
    python_requires='>=3.9',
)

from setuptools import find_packages, setup


def read_requirements():
    with open("requirements.txt") as f:
        lines = [line.strip() for line in f]
    runtime = []
    for line in lines:
        if not line or line.startswith("#"):
            continue
        # Test and lint tools are listed after this marker
        if line.startswith("pytest"):
            break
        runtime.append(line)
    return runtime


setup(
    name="msic",
    version="1.0.0",
    description="Bounds, codes and a linear oracle for multi-sender uniprior index coding",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.10",
    install_requires=read_requirements(),
    entry_points={"console_scripts": ["msic = msic.cli:cli"]},
)

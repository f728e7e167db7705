# Copyright 2024 The optomech Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


from setuptools import find_packages, setup


def fetch_requirements(filename):
    with open(filename) as f:
        return [ln.strip() for ln in f.read().split("\n") if ln.strip()]


setup(
    name="optomech",
    version="0.0.1",
    description="optomech - noise budgets, spectra and fits at the standard quantum limit",
    long_description=open("README.md", "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    keywords="Cavity Optomechanics, Standard Quantum Limit, Spectral Density, Curve Fitting",
    license="Apache License 2.0",
    packages=find_packages(include=["optomech", "optomech.*"]),
    install_requires=fetch_requirements("requirements.txt"),
    entry_points={"console_scripts": ["optomech=optomech.cli:main"]},
)

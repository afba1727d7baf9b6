import os
import random
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_addoption(parser):
    parser.addoption("--scenario-seed", type=int, default=20260817,
                     help="seed for the random scenario generator")


def pytest_configure(config):
    random.seed(config.getoption("--scenario-seed"))

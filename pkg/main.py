"""The main file of the tool which will install all requirements in
a virtual environment and then start the actual process.
"""

import subprocess
import os
import sys

script_directory = os.path.dirname(os.path.realpath(__file__))
os.chdir(script_directory)

bin_directory = "Scripts" if os.name == "nt" else "bin"
venv_python = os.path.join(".venv", bin_directory, "python")

subprocess.run([sys.executable, "-m", "venv", ".venv"], check=True)
subprocess.run([venv_python, "-m", "pip", "install", "--upgrade", "pip"], check=True)
subprocess.run([venv_python, "-m", "pip", "install", "."], check=True)

command_args = [venv_python, "-m", "pslab"] + sys.argv[1:]

sys.exit(subprocess.run(command_args, check=False).returncode)

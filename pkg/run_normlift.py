import os
import pathlib
import subprocess
import sys

if __name__ == "__main__":
    """
    Launcher for the normlift command line. It runs `python -m normlift` with the
    interpreter that runs this script, so the package next to this file is used
    even when it is not installed. All arguments are passed through, and relative
    paths keep resolving against the caller's working directory.
    """
    try:
        # Get the directory where this launcher script is located
        script_dir = pathlib.Path(__file__).parent.resolve()
        package_dir = script_dir / "normlift"

        if not package_dir.exists():
            print(f"Error: The package 'normlift' was not found in the directory:\n{script_dir}", file=sys.stderr)
            sys.exit(1)

        env = dict(os.environ)
        env["PYTHONPATH"] = os.pathsep.join(filter(None, [str(script_dir), env.get("PYTHONPATH")]))

        # Same interpreter as the launcher, which matters for Conda or venv.
        subprocess.run([sys.executable, "-m", "normlift", *sys.argv[1:]], env=env, check=True)

    except subprocess.CalledProcessError as e:
        # normlift uses its exit code for the verdict, so pass it on unchanged
        sys.exit(e.returncode)
    except Exception as e:
        print(f"An unexpected error occurred while trying to launch normlift:\n{e}", file=sys.stderr)
        sys.exit(1)

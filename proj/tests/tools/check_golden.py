"""Regenerates the Aldous golden kernel and compares it with the checked-in file."""
import subprocess
import sys


def main():
    generator, golden = sys.argv[1:3]
    fresh = subprocess.run([sys.executable, generator, "3"], capture_output=True, text=True, check=True).stdout
    with open(golden) as f:
        stored = f.read()
    if fresh.split() != stored.split():
        print("golden file differs from the generator output")
        sys.exit(1)
    print(f"ok {len(stored.splitlines())} lines")


if __name__ == "__main__":
    main()

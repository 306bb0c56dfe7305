import sys
from pathlib import Path

# Make the sibling helper modules (oracles, support) importable.
sys.path.insert(0, str(Path(__file__).parent))

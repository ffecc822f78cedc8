"""
Corpus manifest: model files bundled with the package and the rule profile each must pass
"""

from pathlib import Path

# local imports
from .settings import settings
from .validate import Strictness

CORPUS_DIR = Path(__file__).parent / 'corpus'


def read_lines(filename: str | Path) -> list[str]:
    """
    Read all non-empty and no-comment lines from text file.

    @param filename: file name to read
    @return: all meaningful lines, stripped
    """
    with open(filename, encoding='utf-8') as f:
        lines = f.readlines()

    # filter out comments and empty lines
    return [x.strip() for x in lines if x.strip() and not x.strip().startswith('#')]


class CorpusEntry:
    """A model file and the profile it passes"""
    def __init__(self, input_line: str):
        """Parse and validate a manifest line: file name, tab, strict or lenient"""
        tokens = input_line.split()
        try:
            if len(tokens) != 2:
                raise ValueError(f'expected 2 columns, got {len(tokens)}')
            self.file = tokens[0]
            self.profile = Strictness(tokens[1])
            if not self.file.endswith('.tm'):
                raise ValueError(f'not a model file: {self.file}')

        except Exception as e:
            raise ValueError(f'invalid corpus manifest line: {input_line}: {e}') from e

    def __str__(self):
        return f'{self.file}\t{self.profile}'


class Corpus:
    """Corpus directory with its manifest"""
    def __init__(self, directory: str | Path = None):
        """
        Load and validate the manifest of a corpus directory
        @param directory: corpus directory, the bundled corpus if omitted
        """
        self.directory = Path(directory) if directory else CORPUS_DIR
        self.entries = [CorpusEntry(x) for x in read_lines(self.directory / settings.manifest_file)]

    def __str__(self) -> str:
        return '\n'.join(str(x) for x in self.entries)

    def path(self, entry: CorpusEntry) -> Path:
        return self.directory / entry.file

    def read(self, entry: CorpusEntry) -> str:
        return self.path(entry).read_text(encoding='utf-8')

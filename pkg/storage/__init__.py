from .csvStore import (write_csv, read_csv, config_hash, canonical_json, run_metadata, channel_to_csv,
                       channel_from_csv)
from .jsonStore import write_json, read_json
from .fileLock import file_lock
from .plots import plot_lines, plot_chevron, plot_decays, plot_ecdf, plot_ptm

from .bias import SynthesisBias
from .pool import StrandPool, KeySet, synthesize_pool, assemble_keys, bottleneck
from .pad import PadInventory, save_pad, load_pad
from .pcr import pcr_amplify
from .split import denature_split, umi_tag
from .sequencing import SeqErrorModel, sequence_pad
from .attacks import attack_steal, attack_copy_replace

__all__ = [
    "SynthesisBias", "StrandPool", "KeySet", "synthesize_pool",
    "assemble_keys", "bottleneck", "PadInventory", "save_pad", "load_pad",
    "pcr_amplify", "denature_split", "umi_tag", "SeqErrorModel",
    "sequence_pad", "attack_steal", "attack_copy_replace",
]

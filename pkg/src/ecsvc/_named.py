"""Frozen output of :func:`ecsvc.group.generate_params` for the named groups."""

from .group import GroupParams

# generate_params(2048, 256, b'ecsvc/default-2048')
DEFAULT_2048 = GroupParams(
    p=int(
        "9235697369bb1af3c857043a93d609d87a5c74d4850243d718dea89e28810e7f"
        "e7f130d5a1ac361573752d4db1a02125b6bef952066342eac10dba6a7ad493e6"
        "c71078fa89d14e158b912f93af2c3a2830dd9364ffbadf87abfdebed69d29bbf"
        "9946c697b9496395b2daecc28e90cb9e1e3f869f5be7079b4d00c2388b796bbd"
        "6af9fcc8197975fe21c350323393ecac1c9180f7a6aca805471daab3e4ae08b3"
        "40a3d76a3312b0058bf8c032bc68d1a739c47469b20cc466d5f2823db870c1c9"
        "6e05c3800dcc5932516644768b37b66e71e2771e26d11901cc7ba7b3edec9700"
        "8a17f7f7efd2bfbab7d4b94fc6b620b1a1ce367ce815c192ef3e4d91c4c7e633",
        16,
    ),
    q=int(
        "c16536351ef43b65826e8e7639630e61c3d1a5f82cfaa8e820fa38f221a36b53",
        16,
    ),
    g=int(
        "c903be75db6a00cc0411a036f16ad1257ff15e1841e5b3243d816a7b409e706d"
        "c77b9d60c3b194ce6473abddaa5481969531134e788d896ca3634a39ca6be4c9"
        "fe7b6dbb361d98ae58bc5e391d964b10c69a06bbc6caa09d948e62ad76a8eb36"
        "fe1d5363027b50ca162560d6de222f3e4d623806b083f160c514bc2aee435be7"
        "e9dbb83f24f78b5def844e270de1a55a65c2777acc50b27964b3925ce67bb323"
        "c4eda9c32f239df49eef031a8e7953bcb33a527b8c63fe3e953f4543d9fe9888"
        "1d8f65a923822c8b7acf61dfede1cec718c44809323a0825176908fe1a08e099"
        "de59c0b3395759f1d8cca6fe8b55192b4d34fe678d391e60542aec34465becd",
        16,
    ),
)

# generate_params(512, 160, b'ecsvc/medium-512')
MEDIUM_512 = GroupParams(
    p=int(
        "85e048d121898fb220d969420227dc1acff3ad6ff9adf142277d3db7559aeb97"
        "2d52687fdbf7a631843c1019e2fbeaa24930888320cee4b42215cf1b0f56db6f",
        16,
    ),
    q=int(
        "b44f66d9d534b25961b96942a1e04902c237840f",
        16,
    ),
    g=int(
        "2639023226b76891d9b921282e8323c3bdfa2f444db34d2c7570004e25fddb5b"
        "f664b14d0a94cf11e2ace1b66785ccf3b447b75358886c9006617e26f0f72ca4",
        16,
    ),
)

from fractions import Fraction as F

import pytest

from treedim.config import (
    ConfigError,
    FamilyConfig,
    dump_toml,
    family_from_document,
    family_to_document,
    gale_table_to_document,
    load_family,
    load_gale_table,
)
from treedim.gales import vf_gale_table

from conftest import CONFIGS


def test_shipped_configs_load():
    for path in CONFIGS.glob("*.toml"):
        if "martingale" in path.name:
            assert load_gale_table(path).values
        else:
            assert load_family(path).family.depth >= 1


def test_document_round_trip(fam_c, fam_osc):
    for fam in (fam_c, fam_osc):
        back = family_from_document(family_to_document(fam))
        assert back == fam
        assert back.declared_q == fam.declared_q


def test_document_loads_from_file(tmp_path, fam_b):
    path = tmp_path / "b.toml"
    path.write_text(dump_toml(family_to_document(fam_b)))
    assert load_family(path).family == fam_b
    assert load_family(path, 0).family.depth == 0
    with pytest.raises(ConfigError):
        load_family(path, 3)


def test_n_levels_override():
    assert load_family(CONFIGS / "family_a.toml", 0).family.depth == 0


@pytest.mark.parametrize("d,msg", [
    ({"n_levels": 1}, "sequence"),
    ({"n_levels": 1, "sequence": {"terms": ["0.5", "1/3"]}}, "sequence"),
    ({"n_levels": 1, "sequence": {"terms": ["1/2", "1/3"]}, "t0_variant": "middle"}, "t0_variant"),
    ({"n_levels": 1, "sequence": {"terms": ["1/2", "1/3"]}, "policy": {"min_ell": "cubic:2"}}, "policy"),
    ({"sequence": {"terms": ["1/2", "1/3"]}}, "n_levels"),
    ({"n_levels": 1, "alphabet_size": 1, "sequence": {"terms": ["1/2", "1/3"]}}, "alphabet"),
])
def test_bad_configs(d, msg):
    with pytest.raises(ConfigError, match=msg):
        FamilyConfig.from_dict(d)


def test_builtin_sequence_config():
    cfg = FamilyConfig.from_dict({
        "n_levels": 2,
        "sequence": {"kind": "alternating", "c": "1/2", "d": "1", "m": 3},
        "witness": {"sigma": "1/2"},
    })
    assert cfg.sigma == F(1, 2)
    assert cfg.derive().q(1) == F(1, 4)


def test_gale_table_round_trip(tmp_path, fam_a):
    t = vf_gale_table(fam_a, F(1, 3), 4)
    path = tmp_path / "g.toml"
    path.write_text(dump_toml(gale_table_to_document(t)))
    back = load_gale_table(path)
    assert back.values == t.values and back.sigma == t.sigma


def test_gale_table_rejects_floats(tmp_path):
    path = tmp_path / "g.toml"
    path.write_text('alphabet_size = 2\n[values]\n"" = "0.5"\n')
    with pytest.raises(ConfigError):
        load_gale_table(path)

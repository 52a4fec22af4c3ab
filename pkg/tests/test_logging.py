"""Tests for the bound logging context and the console formatter."""

import logging

import numpy as np
import pytest

from app.certify.monotonicity import lowner_matrix_test
from app.models.phi import PhiSpec
from app.utils.logging import ConsoleFormatter, LogContext, bound_fields

logger = logging.getLogger('app.tests')


def _flat_phi():
    # φ″ declared zero while φ′ = x: every difference-quotient violation is discarded
    return PhiSpec.custom('flat', lambda x: 0.5 * x ** 2, lambda x: x, lambda x: np.zeros_like(x))


def test_records_carry_bound_fields(caplog):
    with caplog.at_level(logging.INFO, logger='app.tests'):
        with LogContext(component='certify', phi='vn', seed=7):
            with LogContext(trial=3):
                logger.info("inner")
            logger.info("outer")
        logger.info("unbound")

    inner, outer, unbound = caplog.records
    assert (inner.component, inner.phi, inner.seed, inner.trial) == ('certify', 'vn', 7, 3)
    assert inner.context == "component=certify phi=vn seed=7 trial=3"
    assert outer.trial is None
    assert unbound.context == ""
    assert bound_fields() == {}


def test_none_fields_are_not_bound():
    with LogContext(phi='vn', seed=None):
        assert bound_fields() == {'phi': 'vn'}


def test_unknown_fields_are_rejected():
    with pytest.raises(ValueError):
        LogContext(colour='red')


@pytest.mark.parametrize('workers', [1, 4])
def test_trial_warnings_carry_phi_seed_and_trial(caplog, workers):
    with caplog.at_level(logging.WARNING, logger='app.certify.monotonicity'):
        lowner_matrix_test(_flat_phi(), 3, 12, seed=5, workers=workers)

    discarded = [r for r in caplog.records if r.getMessage().startswith("Discarded lowner witness")]
    assert len(discarded) == 12
    assert {r.phi for r in discarded} == {'flat'}
    assert {r.seed for r in discarded} == {5}
    assert sorted(r.trial for r in discarded) == list(range(12))


def test_console_formatter_appends_context_without_touching_the_record():
    formatter = ConsoleFormatter('%(levelname)s %(message)s', use_colors=True)
    with LogContext(component='limits', phi='car'):
        record = logging.getLogger('app.tests').makeRecord('app.tests', logging.WARNING, __file__, 1,
                                                           "gap too large", (), None)

    text = formatter.format(record)

    assert text.endswith("gap too large [component=limits phi=car]")
    assert ConsoleFormatter.COLORS['WARNING'] in text
    assert record.levelname == 'WARNING'

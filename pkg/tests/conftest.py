import pytest

from esgbench.ingest import GeneratorConfig, generate


@pytest.fixture(scope="session")
def dataset42():
    """The default 50-stock / 10k-news / 42-day dataset, generated once."""
    return generate(GeneratorConfig())


@pytest.fixture(scope="session")
def small_dataset():
    """A quick dataset for engine plumbing tests."""
    return generate(
        GeneratorConfig(seed=7, n_stocks=10, n_sectors=3, n_news=120, days=6, bars_per_day=3, esg_fraction=0.3)
    )

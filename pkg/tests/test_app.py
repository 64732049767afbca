import pytest

from app import app as flask_app

HEIS = "algebra heisenberg_3 dim 3 field q\n0 1 2 1\n1 0 2 -1\n"
HEIS_GF2 = "algebra heisenberg_3 dim 3 field 2\n0 1 2 1\n1 0 2 1\n"


@pytest.fixture
def client(monkeypatch, tmp_path):
    monkeypatch.setenv('LEIBNIZ_OUTPUT_DIR', str(tmp_path))
    flask_app.config['TESTING'] = True
    with flask_app.test_client() as client:
        yield client


def test_index_lists_profiles(client):
    data = client.get('/').get_json()
    assert '/verify' in data['endpoints']
    assert {p['id'] for p in data['profiles']} >= {'quick', 'default'}


def test_validate(client):
    ok = client.post('/validate', json={'algebra': HEIS}).get_json()
    assert ok['valid'] and ok['violations'] == []
    bad = client.post('/validate', json={'algebra': "algebra x dim 2 field q\n0 0 1 1\n1 0 0 1\n"}).get_json()
    assert not bad['valid']
    assert bad['violations']


def test_series_and_subnormal(client):
    series = client.post('/series', json={'algebra': HEIS}).get_json()
    assert series['dims'] == [3, 1, 0, 0]
    assert series['is_lie'] is True
    chain = client.post('/subnormal', json={'algebra': HEIS, 'sub': '1,0,0'}).get_json()
    assert chain['defect'] == 2
    assert chain['chain'][-1] == [['1', '0', '0']]


def test_residual_check(client):
    data = client.post('/residual-check', json={'algebra': HEIS, 'sub': '1,0,0'}).get_json()
    assert data['passed']
    assert data['residual'] == []


def test_errors_are_bad_requests(client):
    assert client.post('/series', json={}).status_code == 400
    assert client.post('/subnormal', json={'algebra': HEIS}).status_code == 400
    response = client.post('/series', json={'algebra': "algebra x dim 2 field q\n0 0 1 1\n0 0 1 1\n"})
    assert response.status_code == 400
    assert 'line 3' in response.get_json()['error']


def test_compfactors(client):
    bimodule = ("bimodule ad over heisenberg_3 dim 3\nleft 0\n0 0 0\n0 0 0\n0 1 0\n"
                "left 1\n0 0 0\n0 0 0\n1 0 0\nright 0\n0 0 0\n0 0 0\n0 1 0\nright 1\n0 0 0\n0 0 0\n1 0 0\n")
    data = client.post('/compfactors', json={'algebra': HEIS_GF2, 'bimodule': bimodule}).get_json()
    assert data['factor_dims'] == [1, 1, 1]
    assert data['iso_classes'] == [[0, 1, 2]]


def test_catalogue(client):
    data = client.get('/catalogue?field=5').get_json()
    names = [entry['name'] for entry in data['entries']]
    assert 'sl2' in names
    assert client.get('/catalogue?field=6').status_code == 400


def test_verify_and_downloads(client):
    response = client.post('/verify', json={'fields': ['2'], 'budget': 2, 'max_dim': 3})
    data = response.get_json()
    assert response.status_code == 200
    assert data['summary']['failed'] == 0
    assert data['failures'] == []
    report = client.get(data['download_url'])
    assert report.status_code == 200
    assert b'SUMMARY PASS' in report.data
    excel = client.get(data['excel_url'])
    assert excel.status_code == 200
    assert client.get('/download-report-excel/nope').status_code == 404
    assert client.get('/verify').status_code == 405

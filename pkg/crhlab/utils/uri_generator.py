import hashlib
import uuid


class URIGenerator:

    org = 'vital.ai'
    app = 'crhlab'
    base_uri = 'http://vital.ai/' + org + '/' + app + '/'
    namespace = uuid.uuid5(uuid.NAMESPACE_URL, base_uri)

    @classmethod
    def generate_uri(cls, digest: str) -> str:
        # same config digest, same run uri
        unique_id = str(uuid.uuid5(cls.namespace, digest))
        uri = cls.base_uri + 'run/' + unique_id
        return uri

    @classmethod
    def config_digest(cls, text: str) -> str:
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

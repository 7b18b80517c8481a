import { ConsoleApi } from './api.js';
import { AuditorConsole } from './console.js';

const root = document.getElementById('console-root');
if (root) {
  const params = new URLSearchParams(window.location.search);
  const token = params.get('token');
  const api = new ConsoleApi('', token ? { token } : {});
  new AuditorConsole(api, root).start().catch((error) => {
    root.textContent = `console failed to start: ${error}`;
  });
}

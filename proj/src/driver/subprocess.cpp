// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/driver/subprocess.hpp"
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace rr::driver
{
namespace
{
struct Pipe
{
    int fd[2] = {-1, -1};

    Pipe()
    {
        if (::pipe2(fd, O_CLOEXEC) != 0)
            fd[0] = fd[1] = -1;
    }
    ~Pipe()
    {
        close_read();
        close_write();
    }
    void close_read()
    {
        if (fd[0] >= 0)
            ::close(fd[0]);
        fd[0] = -1;
    }
    void close_write()
    {
        if (fd[1] >= 0)
            ::close(fd[1]);
        fd[1] = -1;
    }
    bool ok() const noexcept { return fd[0] >= 0; }
};
}  // namespace

std::string shell_quote(std::string_view s)
{
    std::string out = "'";
    for (const char c : s)
    {
        if (c == '\'')
            out += "'\\''";
        else
            out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::duration<double> timeout, const EnvVars& env)
{
    ProcessResult r;
    if (argv.empty())
    {
        r.start_error = "empty command";
        return r;
    }
    Pipe out_pipe;
    Pipe err_pipe;
    Pipe exec_pipe;
    if (!out_pipe.ok() || !err_pipe.ok() || !exec_pipe.ok())
    {
        r.start_error = std::string{"pipe: "} + std::strerror(errno);
        return r;
    }

    // Everything the child needs is prepared before fork.
    std::vector<char*> args;
    for (const auto& a : argv)
        args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    std::vector<std::string> env_strings;
    for (char** e = environ; *e != nullptr; ++e)
    {
        const std::string_view kv{*e};
        const auto key = kv.substr(0, kv.find('='));
        bool overridden = false;
        for (const auto& [k, v] : env)
            overridden = overridden || k == key;
        if (!overridden)
            env_strings.emplace_back(kv);
    }
    for (const auto& [k, v] : env)
        env_strings.push_back(k + "=" + v);
    std::vector<char*> envp;
    for (auto& e : env_strings)
        envp.push_back(e.data());
    envp.push_back(nullptr);

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0)
    {
        r.start_error = std::string{"fork: "} + std::strerror(errno);
        return r;
    }
    if (pid == 0)
    {
        ::setpgid(0, 0);
        ::dup2(out_pipe.fd[1], STDOUT_FILENO);
        ::dup2(err_pipe.fd[1], STDERR_FILENO);
        const int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0)
            ::dup2(devnull, STDIN_FILENO);
        ::execvpe(args[0], args.data(), envp.data());
        const int e = errno;
        [[maybe_unused]] auto n = ::write(exec_pipe.fd[1], &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out_pipe.close_write();
    err_pipe.close_write();
    exec_pipe.close_write();

    int exec_errno = 0;
    if (::read(exec_pipe.fd[0], &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno))
    {
        int status = 0;
        ::waitpid(pid, &status, 0);
        r.start_error = argv[0] + ": " + std::strerror(exec_errno);
        return r;
    }
    r.started = true;

    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);
    pollfd fds[2] = {{out_pipe.fd[0], POLLIN, 0}, {err_pipe.fd[0], POLLIN, 0}};
    std::string* sinks[2] = {&r.out, &r.err};
    int open_fds = 2;
    char buf[65536];
    while (open_fds > 0)
    {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0)
        {
            r.timed_out = true;
            break;
        }
        const int n = ::poll(fds, 2, static_cast<int>(std::min<int64_t>(left.count(), 1000)));
        if (n < 0 && errno != EINTR)
            break;
        for (int i = 0; i < 2; ++i)
        {
            if (fds[i].fd < 0 || (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0)
                continue;
            const auto got = ::read(fds[i].fd, buf, sizeof buf);
            if (got > 0)
                sinks[i]->append(buf, static_cast<size_t>(got));
            else
            {
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }

    int status = 0;
    if (r.timed_out)
    {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
    }
    else
    {
        // Output closed; the process may still be running.
        while (true)
        {
            const pid_t w = ::waitpid(pid, &status, WNOHANG);
            if (w == pid)
                break;
            if (std::chrono::steady_clock::now() >= deadline)
            {
                r.timed_out = true;
                ::kill(-pid, SIGKILL);
                ::waitpid(pid, &status, 0);
                break;
            }
            ::usleep(1000);
        }
    }
    if (!r.timed_out)
    {
        if (WIFEXITED(status))
            r.exit_code = WEXITSTATUS(status);
        else if (WIFSIGNALED(status))
            r.signal = WTERMSIG(status);
    }
    // Reap stray members of the group.
    ::kill(-pid, SIGKILL);
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ProcessResult run_shell(const std::string& command, std::chrono::duration<double> timeout, const EnvVars& env)
{
    return run_process({"/bin/sh", "-c", command}, timeout, env);
}

}  // namespace rr::driver
